class Cat
    pass
