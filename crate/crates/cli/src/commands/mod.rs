pub mod evaluate;
pub mod oracle;
pub mod patterns;
pub mod pipeline;
pub mod reconstruct;
pub mod simulate;
pub mod tag;
