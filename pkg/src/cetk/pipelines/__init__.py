"""Applications built on the core: classification and fusion decisions."""
