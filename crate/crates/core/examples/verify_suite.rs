use eventual_convexity::cli::verify::render_table;
use eventual_convexity::cli::{run_suite, VerifyOptions};

fn main() {
    println!("{}", render_table(&run_suite(&VerifyOptions::default())));
}
