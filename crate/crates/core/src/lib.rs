pub mod graph;
pub mod schema;
pub mod term;
pub mod lex;
pub mod turtle;
pub mod builder;
pub mod validator;
pub mod query;
pub mod examples;
#[cfg(any(test, feature = "oracle"))]
pub mod testkit;
