/* tslint:disable */
/* eslint-disable */

/**
 * Random instance solved by the two-stage sum-rate solver.
 * Input: `{"receivers": K, "subcarriers": N, "seed": s, "budget": P}`.
 */
export function solve_random(input: string): string;

/**
 * Both oracles on a 3-partition instance.
 * Input: `{"items": [...], "bound": B, "groups": K}`.
 */
export function verify_partition(input: string): string;

/**
 * Capped water-filling plus the rate-versus-budget curve.
 * Input: `{"gains": [...], "caps": [...], "budget": P, "points": n}`.
 */
export function waterfill(input: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly solve_random: (a: number, b: number) => [number, number, number, number];
    readonly verify_partition: (a: number, b: number) => [number, number, number, number];
    readonly waterfill: (a: number, b: number) => [number, number, number, number];
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
