public class TooClosed
{
    public void Poke() { }
}
}
