/* tslint:disable */
/* eslint-disable */

/**
 * A sampled curve.
 */
export class Curve {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    x: Float64Array;
    y: Float64Array;
}

/**
 * Density estimate of a simulated bimodal sample against the true density.
 */
export class DensityDemo {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    estimate: Float64Array;
    grid: Float64Array;
    h: number;
    millis: number;
    sample: Float64Array;
    truth: Float64Array;
}

/**
 * Nadaraya-Watson and local linear fits to a simulated sine-with-kink sample.
 */
export class RegressionDemo {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    grid: Float64Array;
    h: number;
    loclin: Float64Array;
    nw: Float64Array;
    truth: Float64Array;
    xs: Float64Array;
    ys: Float64Array;
}

export function densityDemo(n: number, seed: number, rule: string, value: number, points: number): DensityDemo;

export function kernelCurve(beta: string, n: number): Curve;

export function regressionDemo(n: number, seed: number, rule: string, value: number, points: number): RegressionDemo;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_curve_free: (a: number, b: number) => void;
    readonly __wbg_densitydemo_free: (a: number, b: number) => void;
    readonly __wbg_get_curve_x: (a: number) => [number, number];
    readonly __wbg_get_curve_y: (a: number) => [number, number];
    readonly __wbg_get_densitydemo_estimate: (a: number) => [number, number];
    readonly __wbg_get_densitydemo_grid: (a: number) => [number, number];
    readonly __wbg_get_densitydemo_h: (a: number) => number;
    readonly __wbg_get_densitydemo_millis: (a: number) => number;
    readonly __wbg_get_densitydemo_sample: (a: number) => [number, number];
    readonly __wbg_get_densitydemo_truth: (a: number) => [number, number];
    readonly __wbg_get_regressiondemo_grid: (a: number) => [number, number];
    readonly __wbg_get_regressiondemo_h: (a: number) => number;
    readonly __wbg_get_regressiondemo_loclin: (a: number) => [number, number];
    readonly __wbg_get_regressiondemo_nw: (a: number) => [number, number];
    readonly __wbg_get_regressiondemo_truth: (a: number) => [number, number];
    readonly __wbg_get_regressiondemo_xs: (a: number) => [number, number];
    readonly __wbg_get_regressiondemo_ys: (a: number) => [number, number];
    readonly __wbg_regressiondemo_free: (a: number, b: number) => void;
    readonly __wbg_set_curve_x: (a: number, b: number, c: number) => void;
    readonly __wbg_set_curve_y: (a: number, b: number, c: number) => void;
    readonly __wbg_set_densitydemo_estimate: (a: number, b: number, c: number) => void;
    readonly __wbg_set_densitydemo_grid: (a: number, b: number, c: number) => void;
    readonly __wbg_set_densitydemo_h: (a: number, b: number) => void;
    readonly __wbg_set_densitydemo_millis: (a: number, b: number) => void;
    readonly __wbg_set_densitydemo_sample: (a: number, b: number, c: number) => void;
    readonly __wbg_set_densitydemo_truth: (a: number, b: number, c: number) => void;
    readonly __wbg_set_regressiondemo_grid: (a: number, b: number, c: number) => void;
    readonly __wbg_set_regressiondemo_h: (a: number, b: number) => void;
    readonly __wbg_set_regressiondemo_loclin: (a: number, b: number, c: number) => void;
    readonly __wbg_set_regressiondemo_nw: (a: number, b: number, c: number) => void;
    readonly __wbg_set_regressiondemo_truth: (a: number, b: number, c: number) => void;
    readonly __wbg_set_regressiondemo_xs: (a: number, b: number, c: number) => void;
    readonly __wbg_set_regressiondemo_ys: (a: number, b: number, c: number) => void;
    readonly densityDemo: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
    readonly kernelCurve: (a: number, b: number, c: number) => [number, number, number];
    readonly regressionDemo: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
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
