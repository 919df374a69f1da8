""" Shift Density Tool: shift estimation for translated curves and recovery of the shift law. """
