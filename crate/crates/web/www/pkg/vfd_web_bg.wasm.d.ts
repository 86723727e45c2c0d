/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_simulation_free: (a: number, b: number) => void;
export const gamma_curve: (a: number, b: number, c: number) => [number, number, number, number];
export const growth_factor: (a: number) => number;
export const moser_products: (a: number, b: number, c: number) => [number, number, number, number];
export const simulation_energy: (a: number) => number;
export const simulation_mass: (a: number) => number;
export const simulation_new: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
export const simulation_step: (a: number, b: number) => [number, number];
export const simulation_steps: (a: number) => number;
export const simulation_theta: (a: number) => [number, number];
export const simulation_time: (a: number) => number;
export const simulation_u: (a: number) => [number, number];
export const simulation_x: (a: number) => [number, number];
export const simulation_y: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
