"""fastrg Test Suite"""
