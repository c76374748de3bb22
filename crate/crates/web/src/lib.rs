//! Browser bindings: run the detector on a test function, draw the result,
//! and tabulate a kernel profile.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use statpoints::grid::{GridField, TestFunction};
use statpoints::kernels::{Kernel, KernelKind};
use statpoints::oracle;
use statpoints::pipeline::{self, InputDescriptor, RunOptions, RunReport};
use statpoints::plot::{self, PlotOptions};

const MAX_NODES: usize = 400;

fn setup(
    function: &str,
    kernel: &str,
    n: usize,
) -> Result<(TestFunction, GridField, RunOptions), String> {
    let tf: TestFunction = function
        .parse()
        .map_err(|e: statpoints::Error| e.to_string())?;
    let kind: KernelKind = kernel
        .parse()
        .map_err(|e: statpoints::Error| e.to_string())?;
    if n > MAX_NODES {
        return Err(format!("at most {MAX_NODES} nodes per axis, got {n}"));
    }
    let field = tf.sample(n, n).map_err(|e| e.to_string())?;
    Ok((tf, field, RunOptions::new(kind)))
}

fn report(
    function: &str,
    kernel: &str,
    n: usize,
) -> Result<(TestFunction, GridField, RunReport), String> {
    let (tf, field, opts) = setup(function, kernel, n)?;
    let run = pipeline::run(&field, &opts).map_err(|e| e.to_string())?;
    let report = RunReport::new(
        InputDescriptor::for_function(tf, &field),
        &opts,
        &run,
        false,
    );
    Ok((tf, field, report))
}

/// Report JSON for test function `function` sampled on an `n` x `n` grid.
#[wasm_bindgen]
pub fn find_points(function: &str, kernel: &str, n: usize) -> Result<String, JsError> {
    let (_, _, r) = report(function, kernel, n).map_err(|e| JsError::new(&e))?;
    Ok(r.to_json())
}

/// SVG contour map with detected points and curves, and the exact
/// stationary set when `truth` is set.
#[wasm_bindgen]
pub fn render_plot(
    function: &str,
    kernel: &str,
    n: usize,
    levels: usize,
    truth: bool,
) -> Result<String, JsError> {
    let (tf, field, r) = report(function, kernel, n).map_err(|e| JsError::new(&e))?;
    let gt = truth.then(|| oracle::ground_truth(tf));
    let opts = PlotOptions {
        levels,
        width: 520.0,
        ..PlotOptions::default()
    };
    Ok(plot::render_svg(
        &field,
        &r.positions(),
        &r.bindings,
        gt.as_ref(),
        &opts,
    ))
}

#[derive(Serialize)]
struct Profile {
    alpha: f64,
    inflection: f64,
    r: Vec<f64>,
    phi: Vec<f64>,
    phi_second: Vec<f64>,
}

/// `phi` and `phi''` of a kernel on `[0, r_max]` at the shape parameter an
/// `n` x `n` grid on the unit square implies, as JSON.
#[wasm_bindgen]
pub fn kernel_profile(kernel: &str, n: usize, samples: usize) -> Result<String, JsError> {
    let kind: KernelKind = kernel
        .parse()
        .map_err(|e: statpoints::Error| JsError::new(&e.to_string()))?;
    let step = 1.0 / (n.max(2) - 1) as f64;
    let k = Kernel::for_diagonal_step(kind, step * 2f64.sqrt())
        .map_err(|e| JsError::new(&e.to_string()))?;
    let inflection = kind.omega() / k.alpha();
    let r_max = 3.0 * inflection;
    let samples = samples.clamp(2, 2000);
    let r: Vec<f64> = (0..samples)
        .map(|i| r_max * i as f64 / (samples - 1) as f64)
        .collect();
    let eval = |f: &dyn Fn(f64) -> statpoints::Result<f64>| -> Result<Vec<f64>, JsError> {
        r.iter()
            .map(|&x| f(x).map_err(|e| JsError::new(&e.to_string())))
            .collect()
    };
    let phi = eval(&|x| k.phi(x))?;
    let phi_second = eval(&|x| k.phi_second(x))?;
    let profile = Profile {
        alpha: k.alpha(),
        inflection,
        r,
        phi,
        phi_second,
    };
    Ok(serde_json::to_string(&profile).expect("profile serializes"))
}
