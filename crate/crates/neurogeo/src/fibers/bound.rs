//! Explicit degree bound above which the fiber-counting arguments apply.

use num::BigInt;

use crate::error::NgError;

/// The threshold `(6m)^(2(L-1)^(L-1))` with `m` twice the largest hidden
/// width, computed exactly.
pub fn degree_bound(widths: &[usize]) -> Result<BigInt, NgError> {
    if widths.len() < 3 {
        return Err(NgError::Config(
            "degree bound needs at least one hidden layer".into(),
        ));
    }
    let layers = (widths.len() - 1) as u32;
    let hidden_max = *widths[1..widths.len() - 1]
        .iter()
        .max()
        .expect("hidden slice is nonempty");
    let m = 2 * hidden_max as u64;
    let exponent = 2 * (layers - 1).pow(layers - 1);
    Ok(BigInt::from(6 * m).pow(exponent))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_architectures() {
        assert_eq!(degree_bound(&[2, 2, 1]).unwrap(), BigInt::from(576));
        assert_eq!(degree_bound(&[2, 3, 1]).unwrap(), BigInt::from(1296));
        assert_eq!(degree_bound(&[2, 2, 2, 1]).unwrap(), BigInt::from(24u64).pow(8));
    }

    #[test]
    fn no_hidden_layer_rejected() {
        assert!(degree_bound(&[3, 1]).is_err());
    }
}
