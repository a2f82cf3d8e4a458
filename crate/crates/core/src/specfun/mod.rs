//! Special functions and free-Hamiltonian kernels.

pub mod gamma;
pub mod kernel;
pub mod kummer;

pub use gamma::{digamma, gamma, rgamma};
pub use kernel::{
    certify_lemma3, landau_projector_kernel, landau_projector_plane, resolvent_dx_cylinder,
    resolvent_dx_plane, resolvent_kernel_cylinder, resolvent_kernel_plane, KernelCertificate,
};
pub use kummer::{kummer_u, kummer_u_drho};
