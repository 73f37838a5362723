use eventual_convexity::cli::{catalog_spec, grid_from_spec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = catalog_spec("paper-quadratic-2d")?;
    let out = std::env::temp_dir().join("quadratic-grid.csv");
    let summary = grid_from_spec(&spec, None, 41, spec.integration.seed, &out).map_err(|e| e.message)?;
    println!("{} rows -> {}", summary.rows, summary.grid.display());
    println!("φ range [{:.4}, {:.4}], mask cells {}", summary.phi_min, summary.phi_max, summary.mask_count);
    Ok(())
}
