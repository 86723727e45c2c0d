/* tslint:disable */
/* eslint-disable */

/**
 * Unforced run started from a cold spot of depth `depth` in a unit
 * background.
 */
export class Simulation {
    free(): void;
    [Symbol.dispose](): void;
    energy(): number;
    mass(): number;
    /**
     * `kind` is `"interval"` or `"disk"`; `resolution` is the node count of
     * the interval or the number of radial cells of the disk.
     */
    constructor(kind: string, resolution: number, alpha: number, beta: number, dt: number, depth: number);
    /**
     * Advances `count` backward-Euler steps.
     */
    step(count: number): void;
    steps(): number;
    theta(): Float64Array;
    time(): number;
    /**
     * `u = gamma_R(theta)` at every node.
     */
    u(): Float64Array;
    x(): Float64Array;
    y(): Float64Array;
}

/**
 * `gamma_R` and `-1/r` at `samples` points spread logarithmically over
 * `[lower / 4, 4 upper]`, flattened as `r, gamma_R(r), -1/r` triples.
 */
export function gamma_curve(lower: number, upper: number, samples: number): Float64Array;

/**
 * Growth factor `H` of the exponent sequence.
 */
export function growth_factor(epsilon: number): number;

/**
 * Partial products of the Moser bound for the `u` iteration, followed by
 * the exponents `p_i`, both of length `i_max`.
 */
export function moser_products(epsilon: number, tau: number, i_max: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_simulation_free: (a: number, b: number) => void;
    readonly gamma_curve: (a: number, b: number, c: number) => [number, number, number, number];
    readonly growth_factor: (a: number) => number;
    readonly moser_products: (a: number, b: number, c: number) => [number, number, number, number];
    readonly simulation_energy: (a: number) => number;
    readonly simulation_mass: (a: number) => number;
    readonly simulation_new: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
    readonly simulation_step: (a: number, b: number) => [number, number];
    readonly simulation_steps: (a: number) => number;
    readonly simulation_theta: (a: number) => [number, number];
    readonly simulation_time: (a: number) => number;
    readonly simulation_u: (a: number) => [number, number];
    readonly simulation_x: (a: number) => [number, number];
    readonly simulation_y: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
