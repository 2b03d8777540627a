//! wasm-bindgen entry points for the static page in `www/`. Each returns the
//! same JSON the command line tool prints.

use std::sync::Arc;

use wasm_bindgen::prelude::*;

use tate_kappa::json;
use tate_kappa::theta_torus::lattice_generators;
use tate_kappa::{
    affine_orbit_reps, check_theta_invariance, kac_character, load_root_datum, negative_level_basis, theta_basis,
    theta_pairing_matrix, Twisting,
};

/// Keeps a click from freezing the tab.
const MAX_ORDER: i64 = 16;
const MAX_LEVEL: i64 = 12;

fn tagged(e: impl Into<tate_kappa::Error>) -> String {
    let e = e.into();
    format!("{}: {e}", e.qualified_name())
}

fn bounded(name: &str, v: i64, max: i64) -> Result<i64, String> {
    if (0..=max).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{name} must lie in 0..={max}, got {v}"))
    }
}

pub fn orbits(group: &str, level: i64) -> Result<String, String> {
    let level = bounded("level", level, MAX_LEVEL)?;
    let rd = Arc::new(load_root_datum(group).map_err(tagged)?);
    let tw = Twisting::at_level(rd.clone(), level).map_err(tagged)?;
    let reps = affine_orbit_reps(&tw).map_err(tagged)?;
    let neg = negative_level_basis(&rd, level).map_err(tagged)?;
    Ok(json::orbits(&tw, &reps, Some(&neg)).to_string())
}

pub fn character(group: &str, level: i64, weight: &str, order: i64) -> Result<String, String> {
    let order = bounded("order", order, MAX_ORDER)?;
    let rd = Arc::new(load_root_datum(group).map_err(tagged)?);
    let lambda = json::parse_weight(weight)?;
    if lambda.rank() != rd.rank {
        return Err(format!("{group} needs {} weight coordinates", rd.rank));
    }
    let c = kac_character(&rd, &lambda, level, order).map_err(tagged)?;
    Ok(json::character(&rd.label, &c).to_string())
}

pub fn theta(form: &str, order: i64) -> Result<String, String> {
    let order = bounded("order", order, MAX_ORDER)?;
    let tw = Twisting::torus(json::parse_matrix(form)?).map_err(tagged)?;
    let basis = theta_basis(&tw, order).map_err(tagged)?;
    let gens = lattice_generators(tw.rank());
    let invariant: Vec<bool> = basis.iter().map(|f| gens.iter().all(|p| check_theta_invariance(&tw, f, p))).collect();
    let pairing = theta_pairing_matrix(&tw, order).map_err(tagged)?;
    Ok(json::theta(&tw, order, &basis, &invariant, &pairing).to_string())
}

#[wasm_bindgen(js_name = orbits)]
pub fn orbits_js(group: &str, level: i32) -> Result<String, JsError> {
    orbits(group, level.into()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = character)]
pub fn character_js(group: &str, level: i32, weight: &str, order: i32) -> Result<String, JsError> {
    character(group, level.into(), weight, order.into()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = theta)]
pub fn theta_js(form: &str, order: i32) -> Result<String, JsError> {
    theta(form, order.into()).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn orbits_lists_both_bases() {
        let v: Value = serde_json::from_str(&orbits("A2", 1).unwrap()).unwrap();
        assert_eq!(v["orbits"].as_array().unwrap().len(), 3);
        assert_eq!(v["negative_basis"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn errors_are_tagged() {
        assert!(orbits("Q3", 1).unwrap_err().starts_with("root_data::UnknownType"));
        assert!(theta("[[0]]", 4).unwrap_err().starts_with("affine_weyl::"));
        assert!(character("A1", 1, "[2]", 40).unwrap_err().contains("order"));
        assert!(character("A1", 1, "[2]", 4).unwrap_err().starts_with("kac_characters::NotIntegrable"));
    }

    #[test]
    fn theta_is_invariant() {
        let v: Value = serde_json::from_str(&theta("[[2,1],[1,2]]", 6).unwrap()).unwrap();
        let basis = v["basis"].as_array().unwrap();
        assert_eq!(basis.len(), 3);
        assert!(basis.iter().all(|b| b["invariant"] == Value::Bool(true)));
    }
}
