/* tslint:disable */
/* eslint-disable */

export class Simulation {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Integrate for `duration`, taking at most `max_steps` steps. Returns
     * the number of steps taken.
     */
    advance(duration: number, max_steps: number): number;
    /**
     * Energies, the BD functional and mass drift as JSON.
     */
    diagnostics(): string;
    /**
     * A density bump of relative `amplitude` and `width` about the origin
     * with an outward velocity pulse, on `n_cells` cells of `[0, r_max]`.
     */
    constructor(dim: number, alpha: number, gamma: number, n_cells: number, r_max: number, amplitude: number, width: number, velocity_amplitude: number, wall: boolean);
    r(): Float64Array;
    rho(): Float64Array;
    time(): number;
    u(): Float64Array;
    w(): Float64Array;
}

/**
 * Admissibility report for one parameter point, as JSON. `eta` is ignored
 * outside the weighted planar regime.
 */
export function admissibility(regime: string, alpha: number, gamma: number, eta: number): string;

/**
 * Row-major `n_gamma x n_alpha` map over `alpha in (alpha_lo, 1)` and
 * `gamma in (1, gamma_hi)`: 1 admissible, 0 not, -1 outside the model.
 */
export function admissibility_map(regime: string, n_alpha: number, n_gamma: number, gamma_hi: number): Int8Array;

/**
 * Lower `alpha` bound of a regime.
 */
export function alpha_threshold(regime: string): number;

/**
 * The exact thresholds as JSON.
 */
export function thresholds(): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_simulation_free: (a: number, b: number) => void;
    readonly admissibility: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly admissibility_map: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly alpha_threshold: (a: number, b: number) => [number, number, number];
    readonly simulation_advance: (a: number, b: number, c: number) => [number, number, number];
    readonly simulation_diagnostics: (a: number) => [number, number, number, number];
    readonly simulation_new: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number];
    readonly simulation_r: (a: number) => [number, number];
    readonly simulation_rho: (a: number) => [number, number];
    readonly simulation_time: (a: number) => number;
    readonly simulation_u: (a: number) => [number, number];
    readonly simulation_w: (a: number) => [number, number, number, number];
    readonly thresholds: () => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
