//! Group-theoretic classes: free factors of free groups, squarefree abelian
//! groups indexed by prime sets, and small-cancellation quotients.

pub mod fold;
pub mod free;
pub mod smallcanc;
pub mod sqfree;
pub mod whitehead;
pub mod word;
