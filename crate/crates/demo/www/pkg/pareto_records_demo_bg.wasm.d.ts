/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_recordstream_free: (a: number, b: number) => void;
export const exact_break_pmf: (a: number, b: number) => [number, number];
export const recordstream_new: (a: number) => number;
export const recordstream_push_value: (a: number, b: number) => [number, number];
export const recordstream_state: (a: number) => [number, number];
export const recordstream_step: (a: number) => [number, number];
export const simulate_break_pmf: (a: number, b: number, c: number, d: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
