use obf::fixtures::{wheel_fixture, PocketShape};

#[test]
fn dbg_rotation() {
    let w = wheel_fixture(1, PocketShape::AFeet(1));
    assert!(w.validate().ok());
    for start in 0..w.k() {
        let r = w.rotate_to(start).unwrap();
        let rep = r.validate();
        if let Some(c) = rep.first_failure() {
            panic!("rotate {start}: {}: {}", c.name, c.detail);
        }
    }
}
