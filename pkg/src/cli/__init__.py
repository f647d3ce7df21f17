"""
Command-line interface for the re-uploading classifier trainer
"""
