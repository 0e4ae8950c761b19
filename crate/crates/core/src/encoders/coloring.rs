use crate::code::KeyedCode;
use crate::encoders::Binning;
use crate::error::Result;

/// Turns a binning into a decodable code.
///
/// The binning is a bipartite multigraph between values and bins in which
/// every value has degree `2^k` and every bin at most `2^k`. A proper edge
/// coloring with `2^k` colors always exists; colors become keys, so each
/// value uses each key once and no bin receives two values under one key.
/// Colors are assigned edge by edge, repairing conflicts by swapping the two
/// colors along an alternating path.
pub fn complete_key_assignment(binning: &Binning) -> Result<KeyedCode> {
    let m = binning.m();
    let r = binning.r();
    let colors = 1usize << binning.k();
    // value_side[u][c] = bin joined to value u by an edge of color c
    let mut value_side: Vec<Vec<Option<usize>>> = vec![vec![None; colors]; m];
    let mut bin_side: Vec<Vec<Option<usize>>> = vec![vec![None; colors]; r];

    for (bin, members) in binning.bins().iter().enumerate() {
        for &value in members {
            let alpha = free_color(&value_side[value]);
            let beta = free_color(&bin_side[bin]);
            if bin_side[bin][alpha].is_some() {
                flip_path(&mut value_side, &mut bin_side, bin, alpha, beta);
            }
            value_side[value][alpha] = Some(bin);
            bin_side[bin][alpha] = Some(value);
        }
    }

    let assignment: Vec<Vec<usize>> = (0..colors)
        .map(|c| {
            (0..m)
                .map(|u| value_side[u][c].expect("every value has full degree"))
                .collect()
        })
        .collect();
    KeyedCode::new(binning.k(), r, assignment)
}

fn free_color(slots: &[Option<usize>]) -> usize {
    slots
        .iter()
        .position(Option::is_none)
        .expect("degree bound leaves a free color")
}

/// Swaps colors `alpha` and `beta` along the path that leaves `start_bin` on
/// its `alpha` edge. Afterwards `alpha` is free at `start_bin`.
fn flip_path(
    value_side: &mut [Vec<Option<usize>>],
    bin_side: &mut [Vec<Option<usize>>],
    start_bin: usize,
    alpha: usize,
    beta: usize,
) {
    // (value, bin, color) for each edge on the path; bins are left on
    // alpha edges and values on beta edges
    let mut path = Vec::new();
    let mut bin = start_bin;
    while let Some(value) = bin_side[bin][alpha] {
        path.push((value, bin, alpha));
        let Some(next_bin) = value_side[value][beta] else { break };
        path.push((value, next_bin, beta));
        bin = next_bin;
    }
    for &(value, bin, color) in &path {
        value_side[value][color] = None;
        bin_side[bin][color] = None;
    }
    for &(value, bin, color) in &path {
        let swapped = if color == alpha { beta } else { alpha };
        value_side[value][swapped] = Some(bin);
        bin_side[bin][swapped] = Some(value);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoders::identity_code;
    use crate::error::Error;

    /// Every proper 2^k-edge-coloring of a binning, by brute force.
    fn all_colorings(b: &Binning) -> Vec<KeyedCode> {
        let edges: Vec<(usize, usize)> = b
            .bins()
            .iter()
            .enumerate()
            .flat_map(|(bin, vs)| vs.iter().map(move |&v| (v, bin)))
            .collect();
        let colors = 1usize << b.k();
        let total = colors.pow(edges.len() as u32);
        let mut out = Vec::new();
        for mut idx in 0..total {
            let mut rows = vec![vec![usize::MAX; b.m()]; colors];
            let mut ok = true;
            for &(v, bin) in &edges {
                let c = idx % colors;
                idx /= colors;
                if rows[c][v] != usize::MAX {
                    ok = false;
                    break;
                }
                rows[c][v] = bin;
            }
            if ok {
                if let Ok(code) = KeyedCode::new(b.k(), b.r(), rows) {
                    out.push(code);
                }
            }
        }
        out
    }

    #[test]
    fn recovers_the_paired_code() {
        // bins {4,1},{3,2},{2,3},{1,4} on canonical order (4,3,2,1)
        let b = Binning::new(4, 1, vec![vec![0, 3], vec![1, 2], vec![1, 2], vec![0, 3]]).unwrap();
        let code = complete_key_assignment(&b).unwrap();
        let paired = KeyedCode::new(1, 4, vec![vec![3, 2, 1, 0], vec![0, 1, 2, 3]]).unwrap();
        let proper = all_colorings(&b);
        assert!(proper.contains(&code));
        assert!(proper.contains(&paired));
        assert_eq!(code.bin_contents(), paired.bin_contents());
    }

    #[test]
    fn singletons_give_identity() {
        let b = Binning::new(3, 0, vec![vec![0], vec![1], vec![2]]).unwrap();
        assert_eq!(complete_key_assignment(&b).unwrap(), identity_code(3));
    }

    #[test]
    fn parallel_edges_get_distinct_keys() {
        let b = Binning::new(2, 1, vec![vec![0, 0], vec![1, 1]]).unwrap();
        let code = complete_key_assignment(&b).unwrap();
        assert_eq!(code.assignment(), &[vec![0, 1], vec![0, 1]]);
        assert_eq!(code.decode(1, 1).unwrap(), 1);
    }

    #[test]
    fn needs_path_flips() {
        // an ordering that forces recoloring for three colors classes
        let b = Binning::new(
            4,
            2,
            vec![vec![0, 1, 2, 3], vec![0, 0, 1, 1], vec![2, 2, 3, 3], vec![0, 1, 2, 3]],
        )
        .unwrap();
        let code = complete_key_assignment(&b).unwrap();
        assert_eq!(code.bin_contents(), b.bins());
    }

    #[test]
    fn malformed_binnings_are_rejected_upstream() {
        assert!(matches!(Binning::new(2, 1, vec![vec![0, 0, 0], vec![1, 1]]), Err(Error::MalformedBinning(_))));
    }
}
