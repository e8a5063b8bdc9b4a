pub mod action_table;
pub mod critical;
pub mod poincare;
pub mod scan;
pub mod validate;
