use alloc::vec::Vec;

/// Odd-even transposition network on a line of `m` elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortingNetwork {
    pub m: usize,
    pub rounds: Vec<Vec<(usize, usize)>>,
}

/// `m` rounds alternating even pairs `(0,1),(2,3),..` and odd pairs
/// `(1,2),(3,4),..`, starting with even. When the odd pattern is empty
/// (`m = 2`) the even pattern is repeated.
pub fn sorting_network(m: usize) -> SortingNetwork {
    let pairs = |start: usize| -> Vec<(usize, usize)> {
        (start..m.saturating_sub(1)).step_by(2).map(|i| (i, i + 1)).collect()
    };
    let rounds = (0..m)
        .map(|r| {
            let odd = pairs(r % 2);
            if odd.is_empty() {
                pairs(0)
            } else {
                odd
            }
        })
        .collect();
    SortingNetwork { m, rounds }
}

impl SortingNetwork {
    /// Runs the network as compare-exchange on `values`.
    pub fn apply<T: Ord>(&self, values: &mut [T]) {
        assert_eq!(values.len(), self.m);
        for round in &self.rounds {
            for &(a, b) in round {
                if values[a] > values[b] {
                    values.swap(a, b);
                }
            }
        }
    }
}
