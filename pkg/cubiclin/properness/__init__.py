"""Non-properness certificates, witnesses and non-proper values"""
