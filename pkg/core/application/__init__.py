# Application layer for polyred
# Command handlers and the campaign runner sit between the CLI and the geometry core
