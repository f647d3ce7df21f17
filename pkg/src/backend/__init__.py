"""
Backend components: circuit simulation, amplitude suppression, training engines
"""
