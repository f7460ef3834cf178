/* tslint:disable */
/* eslint-disable */

/**
 * Synthesises a cycle (time in units of the cycle) and its signed-dwell check.
 */
export function dd_schedule(modes: number, repetitions: number, _protected: string, swaps: string): string;

/**
 * Populations under ideal decoupling, or bare hopping when `decouple` is false.
 */
export function ideal_dd_populations(modes: number, spacing_um: number, initial: string, repetitions: number, decouple: boolean): string;

/**
 * Designs a pulse and returns its `b(t)` and `ω(t)/2π` curves.
 */
export function pulse_profile(tp_us: number, tud_us: number, sigma: number, omega0_mhz: number, target_phase: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly dd_schedule: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly ideal_dd_populations: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly pulse_profile: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
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
