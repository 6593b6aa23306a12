/* tslint:disable */
/* eslint-disable */

/**
 * Row-major `rows x cols` classification of `r` in `[r_lo, r_hi]` (columns)
 * and `s` in `[s_lo, s_hi]` (rows, top row is `s_hi`).
 */
export function admissibility_map(cols: number, rows: number, r_lo: number, r_hi: number, s_lo: number, s_hi: number): Uint8Array;

/**
 * One-line verdict for `(r, s)`.
 */
export function classify(r: number, s: number): string;

/**
 * Picard iteration on an 8^3 grid for random data of the given size.
 *
 * Returns `[converged (0/1), delta, d_1, d_2, ...]` with `d_k` the working
 * norm of successive differences; errors become a JS exception.
 */
export function picard_history(r: number, s: number, scale: number, horizon: number, seed: number): Float64Array;

/**
 * Exact flow from `theta0 = amplitude cos(m x)`, `u0 = 0`: the temperature
 * decays as `e^{-m^2 t}` and drives `u = t e^{-m^2 t} theta0 e_3`.
 *
 * Returns `samples + 1` rows of `[t, ||u||_{H^r}, ||theta||_{\dot H^{-s}}]`,
 * flattened, computed from the spectral fields.
 */
export function single_mode_curves(m: number, amplitude: number, r: number, s: number, horizon: number, samples: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly admissibility_map: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
    readonly classify: (a: number, b: number) => [number, number];
    readonly picard_history: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly single_mode_curves: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_table_dealloc: (a: number) => void;
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
