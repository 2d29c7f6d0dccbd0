//! Holds the `acceptance` test target. It is a separate package so that it
//! runs after every other suite in the workspace.
