pub mod conformal;
pub mod elliptic;
pub mod special;
