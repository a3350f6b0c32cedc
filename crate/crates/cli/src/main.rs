fn main() {
    println!("qbench");
}
