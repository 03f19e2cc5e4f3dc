mod common;

use common::{policy_for, rng, small_policy, small_row};
use rand::Rng;
use selstream::error::Error;
use selstream::sss::{self, EncryptedRow, Policy, Row};

#[test]
fn select_and_decrypt_follow_plaintext_semantics() {
    let mut rng = rng(20);
    for n in [1, 2, 3, 5] {
        let keys = sss::init(128, n, &mut rng).unwrap();
        for _ in 0..4 {
            let row = small_row(n, &mut rng);
            let policy = if rng.gen_bool(0.5) { policy_for(&row, &mut rng) } else { small_policy(n, 0.5, &mut rng) };
            let erow = sss::encrypt_row(&keys.mpk, &row, &mut rng).unwrap();
            let pt = sss::authorize_sel(&keys.msk, &policy, &mut rng).unwrap();
            let k = rng.gen_range(1..=n);
            let mt = sss::authorize_dec(&keys.msk, &policy, k, &mut rng).unwrap();
            let expected = policy.matches(&row);
            assert_eq!(sss::select(&erow, &pt).unwrap(), expected);
            match sss::decrypt_cell(&erow, &mt, k) {
                Ok(cell) => {
                    assert!(expected);
                    assert_eq!(cell, row.cell(k).unwrap());
                }
                Err(Error::DecryptionFailed) => assert!(!expected),
                Err(e) => panic!("unexpected error {e}"),
            }
        }
    }
}

#[test]
fn wildcarding_never_deselects() {
    let mut rng = rng(21);
    let n = 4;
    let keys = sss::init(128, n, &mut rng).unwrap();
    for _ in 0..3 {
        let row = small_row(n, &mut rng);
        let policy = policy_for(&row, &mut rng);
        let erow = sss::encrypt_row(&keys.mpk, &row, &mut rng).unwrap();
        let i = rng.gen_range(0..n);
        let wider = policy.with_wildcard(i);
        for p in [&policy, &wider] {
            let pt = sss::authorize_sel(&keys.msk, p, &mut rng).unwrap();
            assert!(sss::select(&erow, &pt).unwrap());
        }
    }
}

#[test]
fn flipping_any_envelope_byte_breaks_decryption() {
    let mut rng = rng(22);
    let keys = sss::init(128, 2, &mut rng).unwrap();
    let row = Row::from_strs(&["secret", "x"]);
    let erow = sss::encrypt_row(&keys.mpk, &row, &mut rng).unwrap();
    let mt = sss::authorize_dec(&keys.msk, &Policy::any(2), 1, &mut rng).unwrap();
    assert_eq!(sss::decrypt_cell(&erow, &mt, 1).unwrap(), b"secret");
    for i in 0..erow.envelopes[0].len() {
        let mut bad = erow.clone();
        bad.envelopes[0][i] ^= 0x01;
        assert!(matches!(sss::decrypt_cell(&bad, &mt, 1), Err(Error::DecryptionFailed)));
    }
}

#[test]
fn serialized_size_is_affine_in_width() {
    let mut rng = rng(23);
    let ns = [4usize, 8, 16, 32];
    let sizes: Vec<f64> = ns
        .iter()
        .map(|&n| {
            let keys = sss::init(128, n, &mut rng).unwrap();
            let row = Row::new(vec![b"0123456789".to_vec(); n]);
            let erow = sss::encrypt_row(&keys.mpk, &row, &mut rng).unwrap();
            assert_eq!(erow.group_elements(), 19 * n + 11);
            let bytes = erow.to_bytes();
            assert_eq!(EncryptedRow::from_bytes(&bytes).unwrap(), erow);
            bytes.len() as f64
        })
        .collect();
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let mx = xs.iter().sum::<f64>() / 4.0;
    let my = sizes.iter().sum::<f64>() / 4.0;
    let sxy: f64 = xs.iter().zip(&sizes).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let ss_res: f64 = xs
        .iter()
        .zip(&sizes)
        .map(|(x, y)| (y - (my + slope * (x - mx))).powi(2))
        .sum();
    let ss_tot: f64 = sizes.iter().map(|y| (y - my).powi(2)).sum();
    let r2 = 1.0 - ss_res / ss_tot;
    assert!(r2 > 0.999, "R^2 = {r2}");
}

#[test]
fn tokens_are_bound_to_stream_width() {
    let mut rng = rng(24);
    let k2 = sss::init(128, 2, &mut rng).unwrap();
    let k3 = sss::init(128, 3, &mut rng).unwrap();
    let erow = sss::encrypt_row(&k2.mpk, &Row::from_strs(&["a", "b"]), &mut rng).unwrap();
    let pt = sss::authorize_sel(&k3.msk, &Policy::any(3), &mut rng).unwrap();
    assert!(matches!(sss::select(&erow, &pt), Err(Error::InvalidParams(_))));
}

#[test]
fn binary_cells_round_trip() {
    let mut rng = rng(25);
    let keys = sss::init(128, 2, &mut rng).unwrap();
    let cells = vec![vec![0u8, 255, 10, 13], vec![7u8; 1000]];
    let row = Row::new(cells.clone());
    let erow = sss::encrypt_row(&keys.mpk, &row, &mut rng).unwrap();
    let policy = Policy::new(vec![Some(cells[0].clone()), None]);
    for k in 1..=2 {
        let mt = sss::authorize_dec(&keys.msk, &policy, k, &mut rng).unwrap();
        assert_eq!(sss::decrypt_cell(&erow, &mt, k).unwrap(), cells[k - 1]);
    }
}
