"""
Utility components: defaults, run configuration, errors
"""
