"""HTTP service exposing the verification toolkit."""
