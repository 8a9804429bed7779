use std::collections::HashMap;

use super::{invmod, Montgomery};

/// Baby-step giant-step table for logarithms to a fixed base.
#[derive(Clone, Debug)]
pub struct BsgsTable {
    mont: Montgomery,
    order: u64,
    steps: u64,
    baby: HashMap<u64, u64>,
    /// base^(-steps), Montgomery form
    giant: u64,
}

impl BsgsTable {
    /// `order` must be a multiple of the order of `base`; `modulus` must be odd.
    pub fn new(base: u64, modulus: u64, order: u64) -> Option<Self> {
        if order == 0 {
            return None;
        }
        let mont = Montgomery::new(modulus);
        let steps = (order as f64).sqrt().ceil() as u64;
        let b = mont.to_mont(base);
        let mut baby = HashMap::with_capacity(steps as usize);
        let mut cur = mont.one();
        for j in 0..steps {
            baby.entry(cur).or_insert(j);
            cur = mont.mul(cur, b);
        }
        let base_inv = invmod(base % modulus, modulus).ok()?;
        let giant = mont.pow(mont.to_mont(base_inv), steps);
        Some(BsgsTable {
            mont,
            order,
            steps,
            baby,
            giant,
        })
    }

    /// The least `e` in `0..order` with `base^e = target`.
    pub fn log(&self, target: u64) -> Option<u64> {
        let mut gamma = self.mont.to_mont(target);
        for i in 0..=self.steps {
            if let Some(&j) = self.baby.get(&gamma) {
                let e = i * self.steps + j;
                if e < self.order {
                    return Some(e);
                }
            }
            gamma = self.mont.mul(gamma, self.giant);
        }
        None
    }
}

/// The least `e` in `0..order` with `base^e = target (mod modulus)`,
/// where `order` is a multiple of the order of `base`. `modulus` must be odd.
pub fn discrete_log(base: u64, target: u64, modulus: u64, order: u64) -> Option<u64> {
    BsgsTable::new(base, modulus, order)?.log(target)
}
