//! Replica calculus over the symmetric group: class algebra, Weingarten
//! functions, transfer matrices and closed forms.

pub mod classes;
pub mod perm;
pub mod weingarten;
pub mod closed_form;
pub mod transfer;
pub mod delta;
pub mod fit;
