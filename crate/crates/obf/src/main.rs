fn main() {
    println!("obf");
}
