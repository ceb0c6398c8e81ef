pub use marginlab;
