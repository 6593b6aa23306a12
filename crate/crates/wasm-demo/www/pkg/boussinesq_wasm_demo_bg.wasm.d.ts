/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const admissibility_map: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
export const classify: (a: number, b: number) => [number, number];
export const picard_history: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const single_mode_curves: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;
