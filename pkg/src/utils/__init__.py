"""Utils module initialization"""