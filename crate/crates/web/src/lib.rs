//! WebAssembly bindings for the browser demo.
//!
//! The `*_json` functions hold all the logic and return JSON strings, so they
//! can be tested natively; the `#[wasm_bindgen]` wrappers only convert errors.

use qprim::classgroup::enumerate_classes;
use qprim::pprim::{classify_all, VerdictJson};
use qprim::qform::BinaryForm;
use qprim::repcount::{for_each_point, spectrum};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Keeps the page responsive.
pub const MAX_ABS_DISCRIMINANT: i64 = 100_000;
pub const MAX_BOUND: i64 = 20_000;

fn check_inputs(d: i64, bound: Option<i64>) -> Result<(), String> {
    if d.abs() > MAX_ABS_DISCRIMINANT {
        return Err(format!("|D| must be at most {MAX_ABS_DISCRIMINANT}"));
    }
    match bound {
        Some(n) if !(1..=MAX_BOUND).contains(&n) => {
            Err(format!("bound must be in 1..={MAX_BOUND}"))
        }
        _ => Ok(()),
    }
}

/// Class group of `d` together with the verdict for every class at `p`.
pub fn class_group_json(d: i64, p: i64) -> Result<String, String> {
    check_inputs(d, None)?;
    let group = enumerate_classes(d).map_err(|e| e.to_string())?;
    let verdicts: Vec<VerdictJson> = classify_all(d, p)
        .map_err(|e| e.to_string())?
        .iter()
        .map(VerdictJson::from)
        .collect();
    let value =
        json!({ "group": group.to_json().map_err(|e| e.to_string())?, "verdicts": verdicts });
    Ok(value.to_string())
}

/// `Q`, `Q^*` and `Q_p^*` of `[a,b,c]` up to `bound`, plus the integers
/// represented only imprimitively at `p`.
pub fn spectrum_json(a: i64, b: i64, c: i64, bound: i64, p: i64) -> Result<String, String> {
    let f = BinaryForm::new(a, b, c).map_err(|e| e.to_string())?;
    check_inputs(f.discriminant(), Some(bound))?;
    if !qprim::intarith::is_prime(p) {
        return Err(format!("{p} is not prime"));
    }
    let s = spectrum(&f, bound, p).map_err(|e| e.to_string())?;
    let missing: Vec<i64> = s.q.iter().copied().filter(|&n| !s.in_qp_star(n)).collect();
    Ok(json!({ "form": f.coeffs(), "D": f.discriminant(), "spectrum": s, "not_p_primitive": missing }).to_string())
}

/// Lattice points with `f(x, y) <= bound` as `[x, y, f(x, y), p-primitive]`.
pub fn lattice_points_json(a: i64, b: i64, c: i64, bound: i64, p: i64) -> Result<String, String> {
    let f = BinaryForm::new(a, b, c).map_err(|e| e.to_string())?;
    check_inputs(f.discriminant(), Some(bound.min(MAX_BOUND)))?;
    if p < 2 {
        return Err(format!("{p} is not prime"));
    }
    let mut points = Vec::new();
    for_each_point(&f, bound, |x, y, n| {
        let primitive = x % p != 0 || y % p != 0;
        points.push(json!([x, y, n, primitive]));
    })
    .map_err(|e| e.to_string())?;
    Ok(json!({ "form": f.coeffs(), "bound": bound, "p": p, "points": points }).to_string())
}

fn to_js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = classGroup)]
pub fn class_group(d: i32, p: i32) -> Result<String, JsError> {
    to_js(class_group_json(d.into(), p.into()))
}

#[wasm_bindgen(js_name = formSpectrum)]
pub fn form_spectrum(a: i32, b: i32, c: i32, bound: i32, p: i32) -> Result<String, JsError> {
    to_js(spectrum_json(
        a.into(),
        b.into(),
        c.into(),
        bound.into(),
        p.into(),
    ))
}

#[wasm_bindgen(js_name = latticePoints)]
pub fn lattice_points(a: i32, b: i32, c: i32, bound: i32, p: i32) -> Result<String, JsError> {
    to_js(lattice_points_json(
        a.into(),
        b.into(),
        c.into(),
        bound.into(),
        p.into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn class_group_and_verdicts() {
        let v = parse(&class_group_json(-56, 3).unwrap());
        assert_eq!(v["group"]["h"], 4);
        let cpp: Vec<bool> = v["verdicts"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x["cpp"].as_bool().unwrap())
            .collect();
        assert_eq!(cpp, [false, false, true, true]);
        assert!(class_group_json(-56, 7)
            .unwrap_err()
            .contains("p divides discriminant"));
        assert!(class_group_json(-1_000_000, 3).is_err());
    }

    #[test]
    fn spectrum_lists_imprimitive_values() {
        let v = parse(&spectrum_json(1, 0, 14, 20, 3).unwrap());
        assert_eq!(v["spectrum"]["Q"], json!([1, 4, 9, 14, 15, 16, 18]));
        assert_eq!(v["not_p_primitive"], json!([9]));
        assert!(spectrum_json(1, 0, 14, 20, 4).is_err());
        assert!(spectrum_json(1, 5, 1, 20, 3).is_err());
    }

    #[test]
    fn lattice_points_cover_the_ellipse() {
        let v = parse(&lattice_points_json(1, 0, 1, 25, 5).unwrap());
        let pts = v["points"].as_array().unwrap();
        // 25 = 0^2 + 5^2 = 3^2 + 4^2: (±5,0), (0,±5) imprimitive
        let imprimitive = pts.iter().filter(|p| p[2] == 25 && p[3] == false).count();
        assert_eq!(imprimitive, 4);
        assert_eq!(pts.iter().filter(|p| p[2] == 25).count(), 12);
        assert!(pts.iter().all(|p| p[2].as_i64().unwrap() <= 25));
    }
}
