//! Shared fixtures for the benchmarks.

use mfz_core::{cantor_convolution, iterate, Budget, DigitSystem};

/// The 3-fold Cantor convolution: d = 3, m = 3.
pub fn cantor3() -> DigitSystem {
    cantor_convolution(3, 0.5).expect("valid preset")
}

/// The 4-fold Cantor convolution: d = 3, m = 4.
pub fn cantor4() -> DigitSystem {
    cantor_convolution(4, 0.5).expect("valid preset")
}

/// Second iterate of [`cantor3`], which has barrier digits 5, 6 and 7.
pub fn cantor3_iterated() -> DigitSystem {
    iterate(&cantor3(), 2, &Budget::default()).expect("regular iterate")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        assert_eq!(cantor4().m(), 4);
        let it = cantor3_iterated();
        assert_eq!((it.d(), it.m()), (9, 12));
        assert!(it.is_barrier_digit(6));
    }
}
