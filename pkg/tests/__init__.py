"""adjustable_auction test files."""
