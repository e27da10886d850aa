"""
Command-line front end: configuration, subcommands and report rendering.
"""
