//! Randomness, encoding, key generation and the client-side encrypt/decrypt.

mod client;
mod encoding;
mod keygen;
pub mod sampling;
mod trivium;

pub use client::{decrypt, decrypt_coeffs, encrypt};
pub use encoding::{Encoder, Plaintext};
pub use keygen::{EvalKeys, KeyGenerator, KeySwitchKey, PublicKey, SecretKey, RELIN_TAG};
pub use trivium::{StreamTag, Trivium};
