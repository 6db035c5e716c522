//! Biquandle-labeled Polyak algebras and the finite type enhancements of
//! biquandle counting invariants they define.
//!
//! A typical session parses a biquandle and a Gauss code, computes the
//! degree `n` algebra, picks an element and evaluates it:
//!
//! ```
//! use bqpolyak::biquandle::Biquandle;
//! use bqpolyak::enhance::{enhancement, parity_element};
//! use bqpolyak::gauss::parse_gauss_code;
//! use bqpolyak::polyak::polyak_basis;
//!
//! let x2 = Biquandle::constant_action(&[1, 0]).unwrap();
//! let p = polyak_basis(&x2, 1, 1);
//! let a = parity_element(&p).unwrap();
//! let k = parse_gauss_code("O1+U2+U1+O2+").unwrap();
//! assert_eq!(enhancement(&k, &x2, &a, 1).unwrap().to_string(), "2u^2");
//! ```
//!
//! Modules, in dependency order: [`biquandle`], [`gauss`], [`labeling`],
//! [`arrow`], [`linalg`], [`polyak`], [`enhance`]. The `oracle` feature
//! adds brute-force reference implementations used by the tests.

pub mod arrow;
pub mod biquandle;
pub mod enhance;
pub mod gauss;
pub mod labeling;
pub mod linalg;
#[cfg(feature = "oracle")]
pub mod oracle;
pub mod polyak;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/biquandles.md")]
    mod biquandles {}
    #[doc = include_str!("../../../book/src/gauss.md")]
    mod gauss {}
    #[doc = include_str!("../../../book/src/labelings.md")]
    mod labelings {}
    #[doc = include_str!("../../../book/src/polyak.md")]
    mod polyak {}
    #[doc = include_str!("../../../book/src/enhancements.md")]
    mod enhancements {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
