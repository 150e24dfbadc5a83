/* tslint:disable */
/* eslint-disable */

/**
 * A live sequence of uniform draws fed through the record stack one at a time.
 */
export class RecordStream {
    free(): void;
    [Symbol.dispose](): void;
    constructor(seed: number);
    /**
     * Push a caller-chosen value, e.g. from a click on the plot.
     */
    push_value(value: number): string;
    state(): string;
    /**
     * Draw the next value, push it, and return the new state.
     */
    step(): string;
}

/**
 * Per-`k` table: limit, closed forms, tail `P[B_n=k, R_{n-1} >= k+1]` (k >= 1),
 * remainder bound, and the enumerated law when `n` is small.
 */
export function exact_break_pmf(n: number, kmax: number): string;

/**
 * Monte Carlo law of `B_n` against the geometric limit.
 */
export function simulate_break_pmf(n: number, trials: number, seed: number, kmax: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_recordstream_free: (a: number, b: number) => void;
    readonly exact_break_pmf: (a: number, b: number) => [number, number];
    readonly recordstream_new: (a: number) => number;
    readonly recordstream_push_value: (a: number, b: number) => [number, number];
    readonly recordstream_state: (a: number) => [number, number];
    readonly recordstream_step: (a: number) => [number, number];
    readonly simulate_break_pmf: (a: number, b: number, c: number, d: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
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
