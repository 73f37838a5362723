use eventual_convexity::concavity::generalized_mean;

fn main() {
    let (a, b, l) = (1.0, 9.0, 0.5);
    for alpha in [f64::NEG_INFINITY, -50.0, -1.0, 0.0, 0.5, 1.0, 3.0] {
        println!("m_{alpha:<5}({a}, {b}; {l}) = {:.6}", generalized_mean(a, b, l, alpha));
    }
    println!("zero argument, α = −1: {}", generalized_mean(0.0, 4.0, 0.3, -1.0));
}
