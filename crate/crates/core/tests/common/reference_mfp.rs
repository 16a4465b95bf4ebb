//! Port of the original reference routines `advMultGerman`, `bruteAdv`,
//! `german` and `twoSideGerman`, kept deliberately naive and 1-based so it
//! shares no code or structure with the library.
//!
//! `maxk` ties are resolved by a stable descending sort, i.e. the leftmost of
//! equal gaps wins. A singleton first sub-sample with unknown minimum yields
//! NaN exactly as in the original (`0 * Inf - 1`).

fn german(sample: &[f64]) -> f64 {
    let r = sample.len() as f64;
    let m = sample.iter().cloned().fold(f64::MIN, f64::max);
    m * (1.0 + 1.0 / r) - 1.0
}

fn two_side_german(sample: &[f64]) -> f64 {
    let r = sample.len() as f64;
    let max = sample.iter().cloned().fold(f64::MIN, f64::max);
    let min = sample.iter().cloned().fold(f64::MAX, f64::min);
    let s = max - min;
    s * (1.0 + 2.0 / (r - 1.0)) - 1.0
}

/// `sample(a:b)` with 1-based inclusive bounds.
fn range(sample: &[f64], a: usize, b: usize) -> &[f64] {
    &sample[a - 1..b]
}

pub fn adv_mult_german(sample: &[u64], l: usize, lower_known: bool) -> f64 {
    let sample: Vec<f64> = sample.iter().map(|&x| x as f64).collect();
    let r = sample.len();
    let mut gaps = vec![0.0; r - 1];
    for i in 1..=r - 1 {
        gaps[i - 1] = sample[i] - sample[i - 1];
    }
    let mut order: Vec<usize> = (1..=r - 1).collect();
    order.sort_by(|&a, &b| gaps[b - 1].partial_cmp(&gaps[a - 1]).unwrap());
    let mut big_gaps: Vec<usize> = order[..l - 1].to_vec();
    big_gaps.sort();
    brute_adv(&sample, l, lower_known, &big_gaps, r)
}

fn brute_adv(sample: &[f64], l: usize, lower_known: bool, big_gaps: &[usize], r: usize) -> f64 {
    let mut ns = vec![0.0; l + 1];
    let mut bad: Vec<usize> = Vec::new();
    let mut nsum = 0.0;
    let subsample = range(sample, 1, big_gaps[0]);
    let mut ksum = subsample.len() as f64;
    if lower_known {
        ns[1] = german(subsample);
        nsum += ns[1];
    } else {
        ns[1] = two_side_german(subsample);
        nsum += ns[1];
    }
    for i in 2..=l - 1 {
        let subsample = range(sample, big_gaps[i - 2] + 1, big_gaps[i - 1]);
        let k = subsample.len();
        if k == 1 {
            bad.push(i);
        } else {
            ksum += k as f64;
            ns[i] = two_side_german(subsample);
            nsum += ns[i];
        }
    }
    let subsample = range(sample, big_gaps[l - 2] + 1, r);
    let k = subsample.len();
    if k == 1 {
        bad.push(l);
    } else {
        ksum += k as f64;
        ns[l] = two_side_german(subsample);
        nsum += ns[l];
    }
    let nhat = nsum / ksum;
    for element in bad {
        ns[element] = nhat;
    }
    ns[1..].iter().sum()
}
