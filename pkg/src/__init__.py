"""
Binary re-uploading classifier trainer
"""
