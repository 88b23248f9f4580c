/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_curve_free: (a: number, b: number) => void;
export const __wbg_densitydemo_free: (a: number, b: number) => void;
export const __wbg_get_curve_x: (a: number) => [number, number];
export const __wbg_get_curve_y: (a: number) => [number, number];
export const __wbg_get_densitydemo_estimate: (a: number) => [number, number];
export const __wbg_get_densitydemo_grid: (a: number) => [number, number];
export const __wbg_get_densitydemo_h: (a: number) => number;
export const __wbg_get_densitydemo_millis: (a: number) => number;
export const __wbg_get_densitydemo_sample: (a: number) => [number, number];
export const __wbg_get_densitydemo_truth: (a: number) => [number, number];
export const __wbg_get_regressiondemo_grid: (a: number) => [number, number];
export const __wbg_get_regressiondemo_h: (a: number) => number;
export const __wbg_get_regressiondemo_loclin: (a: number) => [number, number];
export const __wbg_get_regressiondemo_nw: (a: number) => [number, number];
export const __wbg_get_regressiondemo_truth: (a: number) => [number, number];
export const __wbg_get_regressiondemo_xs: (a: number) => [number, number];
export const __wbg_get_regressiondemo_ys: (a: number) => [number, number];
export const __wbg_regressiondemo_free: (a: number, b: number) => void;
export const __wbg_set_curve_x: (a: number, b: number, c: number) => void;
export const __wbg_set_curve_y: (a: number, b: number, c: number) => void;
export const __wbg_set_densitydemo_estimate: (a: number, b: number, c: number) => void;
export const __wbg_set_densitydemo_grid: (a: number, b: number, c: number) => void;
export const __wbg_set_densitydemo_h: (a: number, b: number) => void;
export const __wbg_set_densitydemo_millis: (a: number, b: number) => void;
export const __wbg_set_densitydemo_sample: (a: number, b: number, c: number) => void;
export const __wbg_set_densitydemo_truth: (a: number, b: number, c: number) => void;
export const __wbg_set_regressiondemo_grid: (a: number, b: number, c: number) => void;
export const __wbg_set_regressiondemo_h: (a: number, b: number) => void;
export const __wbg_set_regressiondemo_loclin: (a: number, b: number, c: number) => void;
export const __wbg_set_regressiondemo_nw: (a: number, b: number, c: number) => void;
export const __wbg_set_regressiondemo_truth: (a: number, b: number, c: number) => void;
export const __wbg_set_regressiondemo_xs: (a: number, b: number, c: number) => void;
export const __wbg_set_regressiondemo_ys: (a: number, b: number, c: number) => void;
export const densityDemo: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
export const kernelCurve: (a: number, b: number, c: number) => [number, number, number];
export const regressionDemo: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
