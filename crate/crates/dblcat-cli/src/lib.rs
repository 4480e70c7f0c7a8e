//! Command-line front end for the dblcat workbench (placeholder while the
//! core library comes up).

pub fn placeholder() {}
