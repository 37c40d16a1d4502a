"""Package initialization files."""

# Empty init files to make directories Python packages
