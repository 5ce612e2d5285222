"""API module initialization"""