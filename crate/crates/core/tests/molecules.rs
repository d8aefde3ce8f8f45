use qadapt::fermion::{build_molecular_hamiltonian, parse_fcidump};
use qadapt::state::{exact_ground_state_in_sector, expectation};
use qadapt::StateVector;

fn load(name: &str) -> qadapt::fermion::MolecularHamiltonian {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    parse_fcidump(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn h4_reference_and_fci_energies() {
    let mol = load("h4_sto3g_r1.5.fcidump");
    let h = build_molecular_hamiltonian(&mol).unwrap();
    let hf = StateVector::basis_state(8, &mol.hf_bitstring().unwrap()).unwrap();
    let e_hf = expectation(&h, &hf).unwrap();
    assert!((e_hf - -1.829137412352687).abs() < 1e-8, "{e_hf}");
    let fci = exact_ground_state_in_sector(&h, 4).unwrap();
    assert!(
        (fci.energy - -1.9961503255188093).abs() < 1e-8,
        "{}",
        fci.energy
    );
}

#[test]
fn lih_fci_energy() {
    let mol = load("lih_sto3g_r2.0.fcidump");
    let h = build_molecular_hamiltonian(&mol).unwrap();
    let fci = exact_ground_state_in_sector(&h, 4).unwrap();
    assert!(
        (fci.energy - -7.8610877724814845).abs() < 1e-8,
        "{}",
        fci.energy
    );
}

#[test]
fn h6_fci_energy() {
    let mol = load("h6_sto3g_r1.5.fcidump");
    let h = build_molecular_hamiltonian(&mol).unwrap();
    let fci = exact_ground_state_in_sector(&h, 6).unwrap();
    assert!(
        (fci.energy - -2.995565425831942).abs() < 1e-8,
        "{}",
        fci.energy
    );
    assert!(fci.residual < 1e-8 * h.one_norm());
}
