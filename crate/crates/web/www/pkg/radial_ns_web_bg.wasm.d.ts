/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_simulation_free: (a: number, b: number) => void;
export const admissibility: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const admissibility_map: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const alpha_threshold: (a: number, b: number) => [number, number, number];
export const simulation_advance: (a: number, b: number, c: number) => [number, number, number];
export const simulation_diagnostics: (a: number) => [number, number, number, number];
export const simulation_new: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number];
export const simulation_r: (a: number) => [number, number];
export const simulation_rho: (a: number) => [number, number];
export const simulation_time: (a: number) => number;
export const simulation_u: (a: number) => [number, number];
export const simulation_w: (a: number) => [number, number, number, number];
export const thresholds: () => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
