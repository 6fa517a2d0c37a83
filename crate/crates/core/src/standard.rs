//! Small named complexes used in tests, examples and the CLI.

use crate::complex::Complex2;

fn build(faces: &[&[&str]]) -> Complex2 {
    Complex2::from_maximal_faces(faces.iter().copied()).expect("static faces are well formed")
}

/// The full triangle `abc`.
pub fn triangle() -> Complex2 {
    build(&[&["a", "b", "c"]])
}

/// Boundary of the tetrahedron on `1..=4`, a triangulated 2-sphere.
pub fn tetrahedron_boundary() -> Complex2 {
    build(&[&["1", "2", "3"], &["1", "2", "4"], &["1", "3", "4"], &["2", "3", "4"]])
}

/// Two triangles `abc` and `cde` meeting only in `c`: collapsible, not shellable.
pub fn vertex_wedge() -> Complex2 {
    build(&[&["a", "b", "c"], &["c", "d", "e"]])
}

/// Two triangles `abc` and `bcd` sharing the edge `bc`.
pub fn edge_pair() -> Complex2 {
    build(&[&["a", "b", "c"], &["b", "c", "d"]])
}

/// A dunce hat: contractible, but with no free face.
///
/// The disk has boundary word `1 2 3 1 2 3 1 3 2` (two sides read forwards,
/// one backwards, each side subdivided `1-2-3-1`). An inner ring `p0..p8`
/// follows the boundary and a centre `q` cones off the ring.
pub fn dunce_hat() -> Complex2 {
    let boundary = ["1", "2", "3", "1", "2", "3", "1", "3", "2"];
    let ring: Vec<String> = (0..9).map(|i| format!("p{i}")).collect();
    let mut faces: Vec<Vec<String>> = Vec::new();
    for i in 0..9 {
        let j = (i + 1) % 9;
        faces.push(vec![boundary[i].into(), boundary[j].into(), ring[i].clone()]);
        faces.push(vec![boundary[j].into(), ring[i].clone(), ring[j].clone()]);
        faces.push(vec!["q".into(), ring[i].clone(), ring[j].clone()]);
    }
    Complex2::from_maximal_faces(faces).expect("dunce hat faces are well formed")
}

/// Octahedron boundary on `n, s, 1..=4`.
pub fn octahedron_boundary() -> Complex2 {
    build(&[
        &["n", "1", "2"],
        &["n", "2", "3"],
        &["n", "3", "4"],
        &["n", "4", "1"],
        &["s", "1", "2"],
        &["s", "2", "3"],
        &["s", "3", "4"],
        &["s", "4", "1"],
    ])
}
