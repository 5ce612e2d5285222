"""Services module initialization"""