using UnityEngine;

public class CutShort : MonoBehaviour
{
    private void Update()
    {
        transform.Translate(Vector3.up /* interrupted
